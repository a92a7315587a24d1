import config
from config import NAME as TITLE


def header():
    return TITLE + " v" + str(config.VERSION)


def body(rows):
    lines = [header()]
    for row in rows:
        lines.append(render(row))
    return lines


def render(row):
    key, value = row
    return key + "=" + str(config.handler(value))


def render(row):
    return str(row)
