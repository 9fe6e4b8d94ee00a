from selfpower.common import version

__version__ = version()
