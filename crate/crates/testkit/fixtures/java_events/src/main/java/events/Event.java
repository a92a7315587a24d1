package events;

public record Event(String name, Priority priority, long timestamp) {
    public boolean urgent() {
        return priority.above(Priority.MEDIUM);
    }
}
