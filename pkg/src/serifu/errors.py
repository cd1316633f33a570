"""Exception hierarchy shared across the package.

Everything user-correctable (bad input files, bad config, bad request
payloads) derives from InputError so the CLI and the service can map it to
exit code 2 / HTTP 422 in one place.
"""


class SerifuError(Exception):
    pass


class InputError(SerifuError):
    """Invalid user-supplied data: corpus files, model files, configs."""


class CorpusError(InputError):
    pass


class ModelError(InputError):
    pass


class ConfigError(InputError):
    pass
