class Service:
    def __init__(self, name: str, endpoint: str):
        self.name = name
        self.endpoint = endpoint

    def describe(self) -> str:
        return self.name + "@" + self.endpoint


def load_service(data: dict) -> Service:
    name = data.pop("name")
    return Service(name, "http://localhost")
