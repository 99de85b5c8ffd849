import { describe, expect, it } from "vitest";
import { join } from "path";
import { CsvError, parseResultCsv, readResultCsv } from "../src/csv";

const FIXTURES = join(__dirname, "fixtures");

describe("parseResultCsv", () => {
  it("reads a fixture with all required columns", () => {
    const rows = readResultCsv(join(FIXTURES, "discriminate.csv"));
    expect(rows.length).toBeGreaterThan(0);
    expect(rows[0].experiment).toBe("discriminate");
    expect(rows[0].metric).toBeDefined();
  });

  it("skips a leading timestamp comment line", () => {
    const text =
      "# generated: 2024-01-01T00:00:00+00:00\r\n" +
      "experiment,arch,n,depth,d_star,ensemble,param,unit,metric,value,std_err,seed,master_seed,version\r\n" +
      "tfim,,4,,,tfim-ground,1.0,n=4/g=1,gap,0.5,,1,2,0.1.0\r\n";
    const rows = parseResultCsv(text);
    expect(rows).toHaveLength(1);
    expect(rows[0].metric).toBe("gap");
  });

  it("names a missing required column", () => {
    const text = "experiment,arch,n\r\nx,y,2\r\n";
    expect(() => parseResultCsv(text)).toThrowError(/missing required column 'depth'/);
  });

  it("rejects an empty file", () => {
    expect(() => parseResultCsv("")).toThrow(CsvError);
  });

  it("rejects a header-only file", () => {
    const text =
      "experiment,arch,n,depth,d_star,ensemble,param,unit,metric,value,std_err,seed,master_seed,version\r\n";
    expect(() => parseResultCsv(text)).toThrowError(/no data rows/);
  });
});
