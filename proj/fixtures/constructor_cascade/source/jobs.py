from factory import build_runner


def nightly() -> str:
    runner = build_runner("nightly", 4)
    return runner.run()


def hourly() -> str:
    return build_runner("hourly", 1).run()


class Scheduler:
    def __init__(self, slots: int):
        self.slots = slots

    def launch(self, name: str) -> str:
        return build_runner(name, self.slots).run()
