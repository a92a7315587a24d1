from report import body, header
import config as cfg

rows = [("a", 1), ("b", 2)]
for line in body(rows):
    print(line)

header = None
print(header, cfg.LEVELS, cfg.MISSING)


class Runner:
    def go(self):
        return body([])
