from shop.cart import Cart, quick_cart
from shop.pricing import describe, cheapest
from shop.missing import nothing
import json


def run():
    cart = quick_cart("a", "b")
    cart.add("c", 3)
    print(describe(cheapest(cart.items)))
    cfg = Config()
    return json.dumps(cart.checkout()), cfg, undefined_name


if __name__ == "__main__":
    run()
