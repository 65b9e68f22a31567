class Exporter:
    def export(self, data: dict) -> str:
        return str(data)


class JsonExporter(Exporter):
    def export(self, data: dict) -> str:
        return "{" + str(data) + "}"


class CsvExporter(Exporter):
    def export(self, data: dict) -> str:
        return ",".join(data)


def publish(e: Exporter, data: dict) -> str:
    return e.export(data)
