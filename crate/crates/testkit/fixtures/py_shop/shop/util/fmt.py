import math


def money(amount, currency):
    return "%s %.2f" % (currency, round_cents(amount))


def round_cents(amount):
    return math.floor(amount * 100) / 100


def pad(text, width=10):
    return text.ljust(width)
