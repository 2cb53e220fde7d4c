/**
 * RFC 4180 CSV reading/writing. Inputs come from the analytics exporter,
 * which quotes only when needed; entity names can legally contain commas
 * so a real parser is required, not split(",").
 */

export type Row = Record<string, string>;

export function parseCsv(text: string): { columns: string[]; rows: Row[] } {
  const records = parseRecords(text);
  if (records.length === 0) {
    return { columns: [], rows: [] };
  }
  const columns = records[0];
  const rows: Row[] = [];
  for (let i = 1; i < records.length; i++) {
    const record = records[i];
    if (record.length === 1 && record[0] === "") continue; // trailing blank line
    const row: Row = {};
    columns.forEach((column, j) => {
      row[column] = record[j] ?? "";
    });
    rows.push(row);
  }
  return { columns, rows };
}

function parseRecords(text: string): string[][] {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    record.push(field);
    field = "";
  };
  const endRecord = () => {
    push();
    records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i++;
        continue;
      }
      field += ch;
      i++;
      continue;
    }
    if (ch === '"' && field === "") {
      inQuotes = true;
      i++;
      continue;
    }
    if (ch === ",") {
      push();
      i++;
      continue;
    }
    if (ch === "\n") {
      endRecord();
      i++;
      continue;
    }
    if (ch === "\r") {
      if (text[i + 1] === "\n") i++;
      endRecord();
      i++;
      continue;
    }
    field += ch;
    i++;
  }
  if (field !== "" || record.length > 0) {
    endRecord();
  }
  return records;
}

function escapeField(value: string): string {
  if (/[",\n\r]/.test(value)) {
    return '"' + value.replace(/"/g, '""') + '"';
  }
  return value;
}

export function writeCsv(columns: string[], rows: Row[]): string {
  const lines = [columns.map(escapeField).join(",")];
  for (const row of rows) {
    lines.push(columns.map((column) => escapeField(row[column] ?? "")).join(","));
  }
  return lines.join("\n") + "\n";
}
