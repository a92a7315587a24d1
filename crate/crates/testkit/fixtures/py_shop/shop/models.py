class Item:
    def __init__(self, name, price):
        self.name = name
        self.price = price

    def label(self):
        return format_label(self.name, self.price)


class Order:
    def __init__(self, items):
        self.items = items

    def total(self):
        return sum(i.price for i in self.items)


def format_label(name, price):
    return name + ": " + str(price)


DEFAULT_CURRENCY = "EUR"
