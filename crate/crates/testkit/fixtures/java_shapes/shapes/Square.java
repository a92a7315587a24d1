package shapes;

public class Square implements Shape {
    private final double side;

    public Square(double side) {
        this.side = side;
    }

    public double area() {
        return side * side;
    }

    public double perimeter() {
        return 4 * side;
    }

    public Square scale(double factor) {
        return new Square(side * factor);
    }

    public Square scale(int factor) {
        return scale((double) factor);
    }
}
