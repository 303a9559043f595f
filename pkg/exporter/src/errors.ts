/** The input file is not a readable checkpoint or network JSON. */
export class FileFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FileFormatError";
  }
}

/** The checkpoint contains a layer kind the network schema cannot express. */
export class UnsupportedLayer extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UnsupportedLayer";
  }
}
