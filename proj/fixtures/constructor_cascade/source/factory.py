from engine import Runner


def build_runner(name: str, workers: int) -> Runner:
    return Runner(name, workers)
