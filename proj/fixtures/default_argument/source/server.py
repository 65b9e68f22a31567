from storage import save_transcript


class Handler:
    def __init__(self, prefix: str):
        self.prefix = prefix

    def handle(self, request_id: str, text: str) -> int:
        return save_transcript(text)
