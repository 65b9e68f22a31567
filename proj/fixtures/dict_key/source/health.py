from services import load_service


def probe() -> str:
    return load_service({"name": "health"}).describe()


def warmup() -> str:
    service = load_service({"name": "cache"})
    return service.describe()
