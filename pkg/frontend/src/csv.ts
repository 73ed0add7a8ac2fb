/**
 * Strict reader for the simulator's results CSV.
 *
 * The schema is fixed (header row, exact column order); anything that does
 * not conform raises a CsvError carrying the 1-based row number.
 */

export const CSV_HEADER =
  "channel,param,decoder_M,f_rule,tie_break,frames,bit_errors,frame_errors," +
  "ber,fer,fer_ci_low,fer_ci_high,tie_frames,obs_checksum";

export interface SimRow {
  channel: string;
  param: number;
  decoderM: number;
  fRule: string;
  tieBreak: string;
  frames: number;
  bitErrors: number;
  frameErrors: number;
  ber: number;
  fer: number;
  ferCiLow: number;
  ferCiHigh: number;
  tieFrames: number;
  obsChecksum: string;
}

export class CsvError extends Error {
  constructor(public readonly row: number, message: string) {
    super(`row ${row}: ${message}`);
    this.name = "CsvError";
  }
}

const COLUMNS = CSV_HEADER.split(",");

function num(row: number, field: string, raw: string): number {
  if (raw.trim() === "") throw new CsvError(row, `empty ${field}`);
  const v = Number(raw);
  if (!Number.isFinite(v)) throw new CsvError(row, `bad ${field}: ${JSON.stringify(raw)}`);
  return v;
}

function int(row: number, field: string, raw: string): number {
  const v = num(row, field, raw);
  if (!Number.isInteger(v) || v < 0) throw new CsvError(row, `bad ${field}: ${JSON.stringify(raw)}`);
  return v;
}

/** Parse the full CSV text; the header is row 1, data rows follow. */
export function parseCsv(text: string): SimRow[] {
  const lines = text.split(/\r?\n/);
  while (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new CsvError(1, "empty file");
  if (lines[0] !== CSV_HEADER) {
    throw new CsvError(1, `header must be exactly "${CSV_HEADER}"`);
  }
  const rows: SimRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const rowNo = i + 1;
    const parts = lines[i].split(",");
    if (parts.length !== COLUMNS.length) {
      throw new CsvError(rowNo, `expected ${COLUMNS.length} fields, found ${parts.length}`);
    }
    const row: SimRow = {
      channel: parts[0],
      param: num(rowNo, "param", parts[1]),
      decoderM: int(rowNo, "decoder_M", parts[2]),
      fRule: parts[3],
      tieBreak: parts[4],
      frames: int(rowNo, "frames", parts[5]),
      bitErrors: int(rowNo, "bit_errors", parts[6]),
      frameErrors: int(rowNo, "frame_errors", parts[7]),
      ber: num(rowNo, "ber", parts[8]),
      fer: num(rowNo, "fer", parts[9]),
      ferCiLow: num(rowNo, "fer_ci_low", parts[10]),
      ferCiHigh: num(rowNo, "fer_ci_high", parts[11]),
      tieFrames: int(rowNo, "tie_frames", parts[12]),
      obsChecksum: parts[13],
    };
    if (row.decoderM < 1) throw new CsvError(rowNo, `decoder_M must be >= 1`);
    if (row.ferCiLow > row.fer || row.fer > row.ferCiHigh) {
      throw new CsvError(rowNo, "confidence interval does not bracket fer");
    }
    rows.push(row);
  }
  return rows;
}
