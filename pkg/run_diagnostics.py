import sys

import pytest

from main import run

print("🔍 Starte Systemdiagnose für Wedge-Stokes...\n")

# 1️⃣ Testsuite
exit_code = pytest.main(["-v"])

# 2️⃣ Selbsttests der Bausteine über die Kommandozeile
checks = {
    "mellin-test": ["mellin-test", "--out", "diagnostics/mellin", "--samples", "5"],
    "polynomial-test": ["polynomial-test", "--out", "diagnostics/polynomial"],
    "inequalities": ["inequalities", "--out", "diagnostics/inequalities", "--samples", "10"],
}
failed = [name for name, argv in checks.items() if run(argv) != 0]

if exit_code == 0 and not failed:
    print("\n✅ Alle Tests und Selbstprüfungen bestanden.")
else:
    if exit_code != 0:
        print(f"\n❌ pytest meldet Exit-Code {exit_code}.")
    for name in failed:
        print(f"❌ Selbstprüfung fehlgeschlagen: {name}")
    exit_code = exit_code or 2

sys.exit(exit_code)
