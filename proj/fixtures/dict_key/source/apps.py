from services import Service, load_service


def start_billing() -> Service:
    return load_service({"name": "billing"})


def start_search() -> Service:
    return load_service({"name": "search"})


def start_mail() -> Service:
    return load_service({"name": "mail"})


def start_auth() -> Service:
    return load_service({"name": "auth"})


def start_audit() -> Service:
    cfg = {"name": "audit"}
    return load_service(cfg)


def start_all() -> list:
    return [start_billing(), start_search(), start_mail(), start_auth(), start_audit()]
