package shapes;

import java.util.List;

public final class Geometry {
    private Geometry() {
    }

    public static double totalArea(List<Shape> shapes) {
        double total = 0;
        for (Shape s : shapes) {
            total += s.area();
        }
        return total;
    }

    public static Shape largest(List<Shape> shapes) {
        Shape best = null;
        for (Shape shape : shapes) {
            if (best == null || shape.area() > best.area()) {
                best = shape;
            }
        }
        return best;
    }

    static double clamp(double value) {
        double total = Math.max(0, value);
        return total;
    }
}
