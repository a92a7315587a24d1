package events.app;

import events.Bus;
import events.Event;
import events.Priority;
import org.external.Thing;

public class Demo {
    public static void main(String[] args) {
        Bus bus = Bus.withLogger();
        Event e = new Event("boot", Priority.HIGH, 0L);
        int n = bus.publish(e);
        Thing t = new Thing();
        Unknown.call(n);
    }
}
