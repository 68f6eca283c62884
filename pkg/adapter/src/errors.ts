export class AdapterError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Document contains no non-whitespace content. */
export class EmptyDocument extends AdapterError {}

/** Model identifier does not resolve to a usable encoder. */
export class ModelLoadFailure extends AdapterError {}

/** Extraction configuration violates a precondition. */
export class InvalidConfig extends AdapterError {}

/** Embedding file is malformed. */
export class FormatError extends AdapterError {}
