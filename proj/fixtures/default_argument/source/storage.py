from typing import Optional


def write_text(path: str, text: str) -> int:
    return len(path) + len(text)


def save_transcript(text: str) -> int:
    return write_text("transcript.txt", text)
