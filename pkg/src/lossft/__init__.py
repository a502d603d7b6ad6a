"""Loss-model fault-tolerance verification for [[7,1,3]] error-correction gadgets."""

__version__ = "0.1.0"
