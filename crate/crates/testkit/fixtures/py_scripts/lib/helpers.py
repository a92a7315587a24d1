def ok():
    return 0


def twice(f):
    return lambda x: f(f(x))
