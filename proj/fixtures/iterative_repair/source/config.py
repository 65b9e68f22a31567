def parse_config(text: str) -> dict:
    return {"raw": text}
