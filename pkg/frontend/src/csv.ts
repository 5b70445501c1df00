// Numeric CSV parsing for uploads: one column per intervention, one row per
// simulation, optional header row (headers become labels). Parsing is I/O,
// not statistics: the numbers go to the API untouched.

export interface ParsedCsv {
  header: string[] | null;
  rows: number[][];
}

export function parseNumericCsv(text: string): ParsedCsv {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("file is empty");
  }
  const first = lines[0].split(",").map((c) => c.trim());
  const numericFirst = first.every((c) => c !== "" && !Number.isNaN(Number(c)));
  const header = numericFirst ? null : first;
  const body = numericFirst ? lines : lines.slice(1);
  const width = header ? header.length : first.length;
  const rows: number[][] = [];
  body.forEach((line, i) => {
    const cells = line.split(",").map((c) => c.trim());
    if (cells.length !== width) {
      throw new Error(`ragged row ${i + 1}: expected ${width} columns, got ${cells.length}`);
    }
    rows.push(
      cells.map((c, j) => {
        const v = Number(c);
        if (c === "" || Number.isNaN(v)) {
          throw new Error(`non-numeric value "${c}" at row ${i + 1}, column ${j + 1}`);
        }
        return v;
      }),
    );
  });
  if (rows.length < 2) {
    throw new Error(`fewer than 2 simulations (got ${rows.length})`);
  }
  return { header, rows };
}
