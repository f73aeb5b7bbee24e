"""Smart-home daily-activity boundary detection and abnormal-behavior
recognition, with a statistical-relational core and a rule-based engine."""

__version__ = "0.1.0"
