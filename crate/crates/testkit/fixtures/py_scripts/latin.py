# caf�
def latin():
    return "caf�"
