from shop.models import Item, Order
from shop import pricing
import shop.util.fmt as fmt


class Cart:
    def __init__(self):
        self.items = []

    def add(self, name, price):
        item = Item(name, price)
        self.items.append(item)
        return item

    def checkout(self):
        order = Order(self.items)
        net = order.total()
        return fmt.money(pricing.gross(net), "EUR")


def quick_cart(*names):
    cart = Cart()
    for n in names:
        cart.add(n, 1)
    return cart
