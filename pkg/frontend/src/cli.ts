#!/usr/bin/env node
/**
 * vqcdisc-plots render <figure-kind> <csv...> -o <path>
 *
 * Reads experiment CSVs and writes an SVG or PNG figure (format from the
 * output extension). Multiple CSVs are concatenated row-wise before
 * extraction, so sweeps split across files plot together.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { CsvError, readResultCsv, ResultRow } from "./csv";
import { extractFigure, FIGURE_KINDS, FigureError, FigureKind } from "./figures";
import { renderToFile } from "./render";

export function main(argv: string[]): number {
  const parser = yargs(argv)
    .scriptName("vqcdisc-plots")
    .command(
      "render <kind> <csv...>",
      "render a figure from experiment CSV files",
      (y) =>
        y
          .positional("kind", {
            choices: FIGURE_KINDS as unknown as string[],
            describe: "figure kind",
            type: "string",
          })
          .positional("csv", {
            array: true,
            type: "string",
            describe: "input CSV file(s)",
          })
          .option("out", {
            alias: "o",
            type: "string",
            demandOption: true,
            describe: "output image path (.svg or .png)",
          })
          .option("title", { type: "string" })
          .option("width", { type: "number", default: 800 })
          .option("height", { type: "number", default: 560 }),
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    });

  let args: any;
  try {
    args = parser.parseSync();
  } catch (err: any) {
    console.error(`error: ${err.message}`);
    return 2;
  }

  try {
    const rows: ResultRow[] = [];
    for (const path of args.csv as string[]) {
      rows.push(...readResultCsv(path));
    }
    const figure = extractFigure(args.kind as FigureKind, rows);
    renderToFile(figure, args.out as string, {
      width: args.width,
      height: args.height,
      title: args.title,
      warn: (msg) => console.warn(`warning: ${msg}`),
    });
    console.log(args.out);
    return 0;
  } catch (err: any) {
    if (err instanceof CsvError || err instanceof FigureError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err.message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
