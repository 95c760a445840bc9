def broken(x)
    if x > 0:
        return x
    return -x

print(broken(3)
