class Runner:
    workers: int = 1

    def __init__(self, name: str, workers: int):
        self.name = name
        self.workers = workers

    def run(self) -> str:
        return self.name + "/" + str(self.workers)
