import shapes.Canvas;
import shapes.Circle;
import shapes.Square;

public class App {
    public static void main(String[] args) {
        Canvas canvas = new Canvas();
        canvas.draw(new Circle(1.5));
        Square sq = new Square(2);
        canvas.draw(sq.scale(3));
        System.out.println(canvas.coverage());
        Triangle t = new Triangle();
    }
}
