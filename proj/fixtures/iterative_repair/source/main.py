from config import parse_config


def boot(text: str) -> dict:
    return parse_config(text)


def reload(text: str) -> dict:
    settings = parse_config(text)
    return settings
