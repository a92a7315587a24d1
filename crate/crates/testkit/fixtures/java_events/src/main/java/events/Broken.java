package events;

public class Broken {
    void ok() {
        Log.write("x");
    }

    void bad( {
        int y = 1;
    }
}
