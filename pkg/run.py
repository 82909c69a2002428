from dotenv import load_dotenv

# Load environment variables; SUPERTAU_ENV picks the configuration
load_dotenv()

from supertau.cli import cli

if __name__ == '__main__':
    cli()
