package events;

@FunctionalInterface
public interface Listener {
    void handle(Event event);
}
