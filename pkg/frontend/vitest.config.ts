import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    fileParallelism: false, // the integration test owns a backend subprocess
    testTimeout: 30_000,
  },
});
