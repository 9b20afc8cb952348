"""spgan: sketch-guided progressive GAN for editable ultrasound-style synthesis."""

__version__ = "0.1.0"
