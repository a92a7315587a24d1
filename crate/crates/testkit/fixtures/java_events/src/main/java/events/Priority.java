package events;

public enum Priority {
    LOW,
    MEDIUM,
    HIGH;

    public boolean above(Priority other) {
        return ordinal() > other.ordinal();
    }
}
