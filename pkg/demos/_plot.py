"""Optional plotting helper: returns pyplot when matplotlib is installed, else None."""
import os


def pyplot():
    try:
        import matplotlib
    except ImportError:
        print("(matplotlib not installed; skipping figures)")
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    os.makedirs("demo_figures", exist_ok=True)
    return plt
