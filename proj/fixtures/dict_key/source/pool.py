from services import Service, load_service


class Pool:
    def __init__(self, size: int):
        self.size = size

    def reports(self) -> Service:
        return load_service({"name": "reports"})

    def export(self) -> Service:
        return load_service({"name": "export"})

    def notify(self) -> Service:
        return load_service({"name": "notify"})
