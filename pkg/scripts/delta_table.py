"""Print the model-geometry table: the fixture elements with their chart
coordinates, class and membership flags."""

from lorentz_geom.ads import FIGURE_COLUMNS, figure_data


def main():
    rows = figure_data()
    print("\t".join(FIGURE_COLUMNS))
    for r in rows:
        print("\t".join(str(r[k]) for k in FIGURE_COLUMNS))


if __name__ == "__main__":
    main()
