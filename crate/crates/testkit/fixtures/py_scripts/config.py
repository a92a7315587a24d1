NAME = "tool"
VERSION = 3
LEVELS = [x * 2 for x in range(VERSION)]
handler = lambda value: value + VERSION
