class Config:
    debug = True


def migrate(cfg):
    return cfg
