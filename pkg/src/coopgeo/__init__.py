"""Cross-layer geographic forwarding with cooperative relaying: a seedable
discrete-event simulator and Monte-Carlo harness."""

__version__ = "0.1.0"
