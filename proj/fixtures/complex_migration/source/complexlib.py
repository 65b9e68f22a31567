class Complex:
    real: float
    imag: float
    metadata: dict

    def __init__(self, real: float, imag: float, metadata: dict):
        self.real = real
        self.imag = imag
        self.metadata = metadata


def create_complex(a: float, b: float, metadata: dict) -> Complex:
    return Complex(a, b, metadata)


def compute_norm(x: float, y: float) -> float:
    return (x * x + y * y) ** 0.5
