from complexlib import compute_norm
from create import func


def process(a: float, b: float, k: float):
    c = func(a, b)
    print(c[0][0], c[0][1])
    norm = compute_norm(c[0][0], c[0][1])
    print(norm * k)
