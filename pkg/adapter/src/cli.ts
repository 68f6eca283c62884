#!/usr/bin/env node
/** Command-line entry: extract a corpus directory or segment one file. */

import * as fs from "fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { AdapterError } from "./errors";
import { DEFAULT_CONFIG, extract, ExtractionConfig, Mode, Packing } from "./extract";
import { segment } from "./segment";

/** Exit status: 0 ok, 1 stage failure, 2 usage error. */
export function main(argv: string[]): number {
  let status = 0;
  const run = (work: () => void) => {
    if (status !== 0) return; // a usage failure was already recorded
    try {
      work();
    } catch (err) {
      if (err instanceof AdapterError || err instanceof Error) {
        process.stderr.write(`error: ${err.message}\n`);
        status = 1;
        return;
      }
      throw err;
    }
  };

  yargs(argv)
    .command(
      "extract",
      "encode a directory of documents into EMB1 + manifest",
      (y) =>
        y
          .option("corpus", {
            type: "string",
            demandOption: true,
            describe: "directory of one-document-per-file text; its name is the language code",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output prefix; writes <out>.emb and <out>.jsonl",
          })
          .option("model", { type: "string", default: DEFAULT_CONFIG.model })
          .option("mode", { choices: ["mp", "st"] as const, default: DEFAULT_CONFIG.mode })
          .option("packing", {
            choices: ["single", "multi"] as const,
            default: DEFAULT_CONFIG.packing,
          })
          .option("max-tokens", { type: "number", default: DEFAULT_CONFIG.maxTokens })
          .option("lang", { type: "string", describe: "override the directory-name language code" })
          .option("batch-size", { type: "number", default: DEFAULT_CONFIG.batchSize }),
      (args) =>
        run(() => {
          const config: ExtractionConfig = {
            model: args.model,
            mode: args.mode as Mode,
            packing: args.packing as Packing,
            maxTokens: args["max-tokens"],
            language: args.lang,
            batchSize: args["batch-size"],
          };
          const result = extract(args.corpus, config, args.out);
          process.stdout.write(JSON.stringify({ config, ...result }, null, 2) + "\n");
        })
    )
    .command(
      "segment",
      "print one sentence per line",
      (y) =>
        y
          .option("file", { type: "string", demandOption: true })
          .option("lang", { type: "string", default: "en" }),
      (args) =>
        run(() => {
          const text = fs.readFileSync(args.file, "utf-8");
          for (const sentence of segment(text, args.lang)) {
            process.stdout.write(sentence + "\n");
          }
        })
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      process.stderr.write(`${msg}\n`);
      status = 2;
    })
    .parseSync();
  return status;
}

if (typeof require !== "undefined" && require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
