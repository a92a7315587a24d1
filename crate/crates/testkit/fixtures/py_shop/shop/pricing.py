from shop.models import Item, DEFAULT_CURRENCY
from shop.util.fmt import money

TAX = 0.2


def gross(net):
    return net * (1 + TAX)


def discount(price, rate):
    TAX = 0
    return price - price * rate + TAX


def describe(item):
    amount = gross(item.price)
    return money(amount, DEFAULT_CURRENCY)


def cheapest(items):
    best = None
    for item in items:
        if best is None or item.price < best.price:
            best = item
    return best
