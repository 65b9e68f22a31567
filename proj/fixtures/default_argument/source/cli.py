from storage import save_transcript


def run_single(name: str, text: str) -> int:
    return save_transcript(text)


def run_batch(names: list, texts: list) -> int:
    total = 0
    for name, text in zip(names, texts):
        total += save_transcript(text)
    return total
