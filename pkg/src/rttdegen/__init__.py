"""RTT presentations of Yangians and quantum loop algebras for gl_N, with
certificate-producing checks of their degeneration."""

__version__ = "0.1.0"
