# =============================================================================
# 🧮 solver/
# Numerische Module des Keil-Stokes-Lösers
# =============================================================================
