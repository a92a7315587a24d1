package events;

import java.util.ArrayList;
import java.util.List;
import static java.util.Objects.requireNonNull;

public class Bus {
    private final List<Listener> listeners = new ArrayList<>();
    private int delivered;

    public void subscribe(Listener listener) {
        listeners.add(requireNonNull(listener));
    }

    public int publish(Event event) {
        for (Listener l : listeners) {
            l.handle(event);
            delivered++;
        }
        return delivered;
    }

    public static Bus withLogger() {
        Bus bus = new Bus();
        bus.subscribe(e -> Log.write(e.name()));
        bus.subscribe(new Listener() {
            public void handle(Event event) {
                if (event.urgent()) {
                    Log.write("urgent");
                }
            }
        });
        return bus;
    }
}
