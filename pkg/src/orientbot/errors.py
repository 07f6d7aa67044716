"""Exceptions shared by the binary model and dataset readers."""


class FileFormatError(ValueError):
    pass


class MagicMismatchError(FileFormatError):
    pass


class VersionMismatchError(FileFormatError):
    pass


class TruncatedFileError(FileFormatError):
    pass
