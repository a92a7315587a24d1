package shapes;

import java.util.ArrayList;
import java.util.List;

public class Canvas {
    private final List<Shape> shapes = new ArrayList<>();
    private double total;

    public void draw(Shape shape) {
        shapes.add(shape);
        total = Geometry.totalArea(shapes);
    }

    public double coverage() {
        double total = Geometry.clamp(this.total);
        return total;
    }

    public Shape biggest() {
        return Geometry.largest(shapes);
    }

    class Layer {
        int depth;

        int deeper() {
            return depth + shapes.size();
        }
    }
}
