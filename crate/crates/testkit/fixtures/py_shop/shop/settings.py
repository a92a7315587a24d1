class Config:
    debug = False


LIMIT = 10
