import time

from complexlib import Complex, create_complex


def func(a: float, b: float) -> tuple:
    timestamp = str(time.time())
    c = (create_complex(a, b), {"time": timestamp})
    return c
